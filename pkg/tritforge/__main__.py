import sys

from tritforge.main import main

sys.exit(main())
