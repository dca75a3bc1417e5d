"""Fixed-radius graphs cannot be both sparse and connected in high dimension.

Remove a radius-r neighbourhood of the cube faces while keeping the rest
connected; the volume that survives shrinks fast with d.
"""
# %%
from netdim import cube_gap_volume

for d in (2, 5, 10, 15, 20, 25, 30):
    print(f"d={d:2d}  r=0.1  volume={cube_gap_volume(d, 0.1):.6f}")
