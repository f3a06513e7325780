"""Channels: data processing, equality conditions, and the V-operator.

Processing both states through a channel can only lose distinguishability.
Unitary and embedding channels lose nothing and map the minimal reverse
test of the pair onto the minimal reverse test of the image; noisy channels
strictly decrease the divergence on non-commuting pairs.
"""

import numpy as np

from qfdiv import (builtin, depolarizing_channel, dpi_check, embedding_channel,
                   equality_check, matrix_sqrt, random_channel, random_state,
                   unitary_channel, v_operator)

rho = np.array([[0.75, 0.15], [0.15, 0.25]], dtype=complex)
sigma = np.array([[0.4, -0.1j], [0.1j, 0.6]], dtype=complex)
f = builtin("square")

print("Fixed non-commuting qubit pair, f(y) = y^2.\n")

channels = {
    "random CPTP (env 3)": random_channel(2, 2, 3, seed=5),
    "depolarizing 0.3":    depolarizing_channel(2, 0.3),
    "unitary rotation":    unitary_channel(np.array(
        [[np.cos(0.4), -np.sin(0.4)], [np.sin(0.4), np.cos(0.4)]])),
    "embed into dim 4":    embedding_channel(2, 4),
}
for name, ch in channels.items():
    res = dpi_check(rho, sigma, ch, f)
    print(f"  {name:22s} in = {res.value_in:.6f}  out = {res.value_out:.6f}"
          f"  non-increasing: {res.holds}")

print("\nEquality analysis:")
for name in ("unitary rotation", "embed into dim 4", "depolarizing 0.3"):
    rep = equality_check(rho, sigma, channels[name], f)
    print(f"  {name:22s} equal = {rep.equal!s:5s}  "
          f"reverse test preserved = {rep.reverse_test_preserved!s:5s}  "
          f"p = p' and q = q': {rep.p_match and rep.q_match}")
print("Preservation of the value forces the channel to carry the minimal")
print("reverse test atoms across; noise breaks that rigidity.")

print("\nThe V-operator pulls the output square root back to the input one")
ch = channels["random CPTP (env 3)"]
got = v_operator(ch, sigma, matrix_sqrt(ch.apply(sigma)))
print(f"  || V(out^1/2) - sigma^1/2 ||_max = "
      f"{np.abs(got - matrix_sqrt(sigma)).max():.2e}")
rng = np.random.default_rng(0)
Z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
print(f"  Hilbert-Schmidt contraction: ||V(Z)|| = "
      f"{np.linalg.norm(v_operator(ch, sigma, Z)):.4f} <= ||Z|| = "
      f"{np.linalg.norm(Z):.4f}")
