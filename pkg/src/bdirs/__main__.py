import sys

from bdirs.cli import main

sys.exit(main())
