import sys

from genmix.cli import main

sys.exit(main())
