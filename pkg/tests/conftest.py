import os

from hypothesis import settings

os.environ.setdefault("PDEGLAB_CHECK_DEGREE", "1")

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")
