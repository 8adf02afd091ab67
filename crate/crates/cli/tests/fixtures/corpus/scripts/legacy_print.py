# Ancient utility kept verbatim for reference.
import sys

def shout(msg):
    print "[loud]", msg.upper()

def whisper(msg):
    print "[soft]", msg.lower()

if __name__ == "__main__":
    shout(sys.argv[1])
    whisper(sys.argv[1])
