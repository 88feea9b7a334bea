"""
Bezier simplex basics
=====================

Build a curved triangle in objective space, evaluate it, and sample from
the generative model it defines.
"""

import numpy as np

from bezierabc import BezierModel, enumerate_degrees, evaluate, model_to_json, sample_model

# An order-2 Bezier simplex over the 2-simplex into R^3 has one control
# point per degree (d1, d2, d3) with d1 + d2 + d3 = 2: six in total.
print(enumerate_degrees(2, 3))

# Corner control points pin the surface at the simplex vertices; the three
# edge midpoint controls bend it.
control = np.array(
    [
        [1.0, 0.0, 0.0],  # degree (2,0,0): vertex 1
        [0.6, 0.6, 0.1],  # degree (1,1,0)
        [0.6, 0.1, 0.6],  # degree (1,0,1)
        [0.0, 1.0, 0.0],  # degree (0,2,0): vertex 2
        [0.1, 0.6, 0.6],  # degree (0,1,1)
        [0.0, 0.0, 1.0],  # degree (0,0,2): vertex 3
    ]
)
model = BezierModel(order=2, dim=3, control=control)

# At a vertex of the parameter simplex the surface hits the corner control
# point exactly.
print("b(e_1) =", evaluate(model, np.array([1.0, 0.0, 0.0])))

# At the barycenter every control point contributes.
print("b(center) =", evaluate(model, np.array([1 / 3, 1 / 3, 1 / 3])))

# The model doubles as a sampler: parameters drawn uniformly on the simplex
# are pushed through the surface.  This is the likelihood the ABC fitter
# simulates from.
rng = np.random.default_rng(0)
cloud = sample_model(model, 5, rng)
print("five pushed-forward samples:\n", np.round(cloud, 4))

# Models serialize to a plain JSON dict with degrees in canonical order.
payload = model_to_json(model)
print("serialized degrees:", [entry["degree"] for entry in payload["control_points"]])
