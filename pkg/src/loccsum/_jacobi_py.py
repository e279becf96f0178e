"""Pure numpy twin of the compiled Jacobi sweep kernel."""
import math

import numpy as np


def jacobi_sweeps(at, vt, tol, max_sweeps):
    """Orthogonalize the rows of ``at`` in place, accumulating rotations in ``vt``.

    Returns the number of sweeps used, or -1 if ``max_sweeps`` was exhausted
    with rotations still above ``tol``.
    """
    n = at.shape[0]
    for sweep in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                x = at[i]
                y = at[j]
                alpha = float(np.vdot(x, x).real)
                beta = float(np.vdot(y, y).real)
                gamma = complex(np.vdot(x, y))
                g = abs(gamma)
                if g == 0.0 or g <= tol * math.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * g)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                ph = gamma.conjugate() / g
                for w in (at, vt):
                    xi = w[i].copy()
                    yj = w[j] * ph
                    w[i] = c * xi - s * yj
                    w[j] = s * xi + c * yj
        if not rotated:
            return sweep + 1
    return -1
