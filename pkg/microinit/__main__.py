import sys

from microinit.main import main

sys.exit(main())
