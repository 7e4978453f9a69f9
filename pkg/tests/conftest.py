import os
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
