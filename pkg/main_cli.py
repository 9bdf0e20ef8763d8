import os
import sys
from dotenv import load_dotenv

# ✅ 在所有其他导入之前加载环境变量
load_dotenv()

import logging

logging.basicConfig(
    level=os.getenv("GINOT_LOG_LEVEL", "INFO").upper(),
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
)

from ginot_operator.cli import main

if __name__ == "__main__":
    sys.exit(main())
