import sys

from mdsp.cli import main

sys.exit(main())
