# Rank computation defaults
DEFAULT_ALPHA = 0.85
DEFAULT_TAU = 1e-10
# Frontier tolerance is the iteration tolerance divided by this value
FRONTIER_TOLERANCE_DIVISOR = 1e5
DEFAULT_MAX_ITERATIONS = 500
# Vertices per unit of dynamically scheduled work
DEFAULT_CHUNK_SIZE = 2048

# Reference ranks are computed far below double precision, so the run is bounded by iterations
REFERENCE_TAU = 1e-100
REFERENCE_MAX_ITERATIONS = 500

# Insertion sampling gives up after this many draws per requested insertion
INSERTION_RETRY_FACTOR = 100
DEFAULT_INSERT_RATIO = 0.8
DEFAULT_REPETITIONS = 5

# Invariant spot checks are skipped above this vertex count
SPOT_CHECK_MAX_VERTICES = 100_000

THREADS_ENV_VAR = 'DYNRANK_THREADS'
