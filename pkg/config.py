#!/usr/bin/env python3
"""
Configuration settings for the real-algebra toolkit
"""

import os
import shlex
import logging
from typing import List

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)


class Config:
    """Toolkit configuration"""

    # Numeric SOS phase
    SOS_MAX_SWEEPS = int(os.getenv('SOS_MAX_SWEEPS', '5000'))
    SOS_TOLERANCE = float(os.getenv('SOS_TOLERANCE', '1e-9'))
    SOS_MARGIN = float(os.getenv('SOS_MARGIN', '1e-6'))
    SOS_KERNEL_TOLERANCE = float(os.getenv('SOS_KERNEL_TOLERANCE', '1e-5'))
    SOS_MAX_DENOMINATOR_EXPONENT = int(os.getenv('SOS_MAX_DENOMINATOR_EXPONENT', '8'))
    SOS_ZERO_SEARCH_POINTS = int(os.getenv('SOS_ZERO_SEARCH_POINTS', '5000'))

    # Exact layer limits
    MAX_DEGREE_PER_VARIABLE = int(os.getenv('MAX_DEGREE_PER_VARIABLE', '64'))
    SDPA_MAX_DENOMINATOR = int(os.getenv('SDPA_MAX_DENOMINATOR', '1000000'))

    # Bisection
    BISECT_MAX_DOUBLINGS = int(os.getenv('BISECT_MAX_DOUBLINGS', '20'))

    # Batch mode
    BATCH_MAX_WORKERS = int(os.getenv('BATCH_MAX_WORKERS', '4'))

    # Logging
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'WARNING')
    LOG_FILE = os.getenv('LOG_FILE', '')

    @staticmethod
    def load_batch(batch_file: str) -> List[List[str]]:
        """Load CLI invocations from a batch file, one per line"""
        instances = []
        with open(batch_file, 'r') as f:
            for line in f:
                line = line.strip()
                # Skip empty lines and comments
                if line and not line.startswith('#'):
                    instances.append(shlex.split(line))
        logger.info(f"Loaded {len(instances)} instances from {batch_file}")
        return instances
