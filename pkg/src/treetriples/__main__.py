import sys

from .pipeline_io import main

sys.exit(main())
