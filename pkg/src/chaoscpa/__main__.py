import sys

from chaoscpa.cli import main

sys.exit(main())
