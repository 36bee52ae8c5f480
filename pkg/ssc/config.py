"""
Configuration module for the subspace clustering benchmark.
Loads default settings from environment variables (and a local .env file).
"""
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Sparse coding defaults
K = int(os.getenv('SSC_K', '6'))  # Max neighbors per point
RCON = int(os.getenv('SSC_RCON', '2'))  # First-neighbor budget per point
EPS = float(os.getenv('SSC_EPS', '1e-6'))  # Residual-norm stopping threshold

# Spectral clustering defaults
KMEANS_RESTARTS = int(os.getenv('SSC_KMEANS_RESTARTS', '10'))
KMEANS_MAX_ITER = int(os.getenv('SSC_KMEANS_MAX_ITER', '300'))

# Experiment defaults
SEED = int(os.getenv('SSC_SEED', '0'))
TRIALS = int(os.getenv('SSC_TRIALS', '1'))
WORKERS = int(os.getenv('SSC_WORKERS', '1'))  # Threads for coder completion / sweep trials

# Sweep presets (points per subspace, noise rate)
SWEEP_POINTS_DEFAULT = [10, 50, 100, 200, 300, 400, 500]
SWEEP_NOISE_DEFAULT = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]

# Logging Configuration
LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
LOG_FILE = os.getenv('LOG_FILE', 'logs/bench.log')
