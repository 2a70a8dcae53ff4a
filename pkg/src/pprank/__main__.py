import sys

from pprank.cli import main

sys.exit(main())
