# API modules for LAURA Route: language model gateway and experiment harness

# Import API modules to make them accessible
from . import prompts
from . import llm_client
from . import generators
from . import bench
from . import plotting
