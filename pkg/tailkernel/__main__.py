import sys

from tailkernel.app import main

sys.exit(main())
