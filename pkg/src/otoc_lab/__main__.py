import sys

from otoc_lab.runner import main

sys.exit(main())
