"""
Phase diagram over the right coin angles
========================================

max Im E over (theta1_R, theta2_R) with the left bulk held fixed.  The
exact/broken boundary sits at |cos theta2_R| = tanh gamma for every theta1_R.
Printed as a coarse character map: '#' broken, '.' exact.
"""

import math

from nbwalk import CoinParams, GridSpec, exceptional_theta2, phase_diagram

gamma = 0.2746
pd = phase_diagram(gamma, CoinParams.from_pi(-0.0625, 0.75), GridSpec(n_theta1=21, n_theta2=41), threads=4)

print(f"boundary at theta2_R = +-{exceptional_theta2(gamma) / math.pi:.4f} pi and +-{1 - exceptional_theta2(gamma) / math.pi:.4f} pi")
print("theta1_R/pi  theta2_R from -1 to 1 ->")
for a, row in zip(pd.theta1_pi, pd.broken()):
    print(f"  {a:+.2f}     " + "".join("#" if b else "." for b in row))
