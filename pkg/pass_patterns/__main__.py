"""Allow running as: python -m pass_patterns"""

import sys
from pass_patterns.cli import main

sys.exit(main())
