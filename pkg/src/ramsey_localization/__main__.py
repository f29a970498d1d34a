import sys

from ramsey_localization import cli


if __name__ == '__main__':
    sys.exit(cli.main())
