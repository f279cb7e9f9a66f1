"""Allow ``python -m kiosk_assistant``."""

import sys

from .cli import main

sys.exit(main())
