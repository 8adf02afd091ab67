import argparse

def build_parser():
    parser = argparse.ArgumentParser(description="bulk image resizer")
    parser.add_argument("--input", required=True, help="input directory")
    parser.add_argument("--output", required=True, help="output directory")
    parser.add_argument("--width", type=int, default=800)
    parser.add_argument("--height", type=int, default=600)
    parser.add_argument("--quality", type=int, default=85)
    parser.add_argument("--verbose", action="store_true")
    return parser

def main(argv=None):
    args = build_parser().parse_args(argv)
    print(args.input, "->", args.output)

if __name__ == "__main__":
    main()
