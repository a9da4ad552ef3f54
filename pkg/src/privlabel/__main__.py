import sys

from privlabel.cli import main

sys.exit(main())
