import sys

from code_basis_reduction.cli import main

sys.exit(main())
