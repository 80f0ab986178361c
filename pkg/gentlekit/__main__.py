import sys

from gentlekit.main import main

sys.exit(main())
