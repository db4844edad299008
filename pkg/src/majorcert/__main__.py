import sys

from majorcert.cli import main

sys.exit(main())
