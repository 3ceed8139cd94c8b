import sys

from stalab.cli import main

sys.exit(main())
