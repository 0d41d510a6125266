import sys

from handlecalc.cli import main

sys.exit(main())
