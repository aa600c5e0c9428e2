import sys

from boundary_dimension.cli import main


sys.exit(main())
