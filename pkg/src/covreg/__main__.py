import sys

from covreg.cli import main

sys.exit(main())
