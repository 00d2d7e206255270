"""Pure NumPy versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and semantics; used when the extension is not built or when
``ENTROPIC_PURE_PYTHON=1`` is set.
"""

import numpy as np


def softmin_rows(cost, pot, log_w, eps, out):
    z = (pot / eps + log_w)[None, :] - cost / eps
    mx = z.max(axis=1)
    out[:] = -eps * (mx + np.log(np.exp(z - mx[:, None]).sum(axis=1)))


def softmin_cols(cost, pot, log_w, eps, out):
    z = (pot / eps + log_w)[:, None] - cost / eps
    mx = z.max(axis=0)
    out[:] = -eps * (mx + np.log(np.exp(z - mx[None, :]).sum(axis=0)))
