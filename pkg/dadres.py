import sys

from src.cli import main

# =============================
#            main
# =============================
if __name__ == "__main__":
    sys.exit(main())
