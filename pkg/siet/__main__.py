"""Allow ``python -m siet``."""

import sys

from siet.main import main

if __name__ == "__main__":
    sys.exit(main())
