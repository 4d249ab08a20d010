from hetvenet.cli import main
import sys

sys.exit(main())
