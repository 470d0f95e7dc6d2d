"""
Separation oracles for the perspective formulation.

Three cut families are available, each as a pure function of a fractional
point and the structure it is separated against:

- separate_x_bounds: lower/upper bounds linking x_i to (rho, y)
- separate_odd_cycle: odd-cycle rows on the bundles with at most two items
- separate_running_intersection: running-intersection rows around central bundles

Example usage:

```python
from logit_mp.separation import (
    CutPool, FractionalPoint, build_ri_structures,
    separate_odd_cycle, separate_running_intersection, separate_x_bounds,
)

point = FractionalPoint.from_values(solution.values, bundles, H.num_products)
pool = CutPool()
pool.extend(separate_x_bounds(point, H, eps=1e-5))
pool.extend(separate_odd_cycle(point, H, eps=1e-5))
pool.extend(separate_running_intersection(point, build_ri_structures(H, m_bar=3)))
```
"""

from .base import Cut, CutFamily, CutPool, FractionalPoint, dedupe, make_cut
from .odd_cycle import doubled_graph, odd_cycle_inequality, separate_odd_cycle
from .running_intersection import (
    RIStructure,
    build_ri_structures,
    ric_terms,
    separate_running_intersection,
)
from .x_bounds import separate_x_bounds, x_lower_terms, x_upper_terms

__all__ = [
    "Cut",
    "CutFamily",
    "CutPool",
    "FractionalPoint",
    "RIStructure",
    "build_ri_structures",
    "dedupe",
    "doubled_graph",
    "make_cut",
    "odd_cycle_inequality",
    "ric_terms",
    "separate_odd_cycle",
    "separate_running_intersection",
    "separate_x_bounds",
    "x_lower_terms",
    "x_upper_terms",
]
