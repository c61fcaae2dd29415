import sys

from dynrank.api.main import main

if __name__ == '__main__':
    sys.exit(main())
