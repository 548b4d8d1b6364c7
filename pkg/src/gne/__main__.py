import sys

from gne.cli import main

sys.exit(main())
