import sys

from asymptote.cli import main

sys.exit(main())
