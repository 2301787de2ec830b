import sys

from prooflist.cli import main

sys.exit(main())
