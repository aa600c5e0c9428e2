import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from boundary_dimension.partition_generators import register_length_rule


@dataclass(frozen=True)
class InverseCubeRule:
    monotone = True

    def neg_log_length(self, log_n):
        return 3 * np.asarray(log_n, dtype=float) + math.log(special.zeta(3))


register_length_rule('inverse-cube', InverseCubeRule(), total=1.0)
