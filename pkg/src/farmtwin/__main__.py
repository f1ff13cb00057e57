import sys

from farmtwin.cli import main

sys.exit(main())
