import sys
from swim.cli import main

sys.exit(main())
