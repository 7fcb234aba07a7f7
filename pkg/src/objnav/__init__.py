"""Open-vocabulary object navigation stack.

Subpackages:
    perception  -- blur gating and detection smoothing
    planner     -- long-horizon task decomposition and object extraction
    model       -- the language-to-motion sequence model and its trainer
    executor    -- the functional execution state machine
    datagen     -- synthetic training-corpus generation
    sim         -- 2D kinematic tracking benchmark
    cli         -- command-line harness wiring everything together
"""

__version__ = "0.1.0"
