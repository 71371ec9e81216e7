import sys

from suffixlemma.cli import main

sys.exit(main())
