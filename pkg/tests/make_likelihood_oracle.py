"""One-off generator for frozen likelihood expectations.

Evaluates the transition density, the step log-likelihood, and its rate
derivative with mpmath at 50 digits, using the exact float64 inputs the
library will see.  Printed values are pasted into test_likelihood.py.
Run:  python3 tests/make_likelihood_oracle.py
"""

import mpmath as mp
import numpy as np

mp.mp.dps = 50

CLASSIFY_TOL = mp.mpf("1e-9")


def density_ac(x, t, rate, speed):
    x, t, rate, speed = map(mp.mpf, (x, t, rate, speed))
    u = (speed * t) ** 2 - x**2
    assert u > 0
    z = rate * mp.sqrt(u) / speed
    return (mp.e ** (-rate * t) / (2 * speed)) * (
        rate * mp.besseli(0, z) + rate * speed * t * mp.besseli(1, z) / mp.sqrt(u)
    )


def step_loglik(rate, u_list, n, delta, speed):
    rate, delta, speed = map(mp.mpf, (rate, delta, speed))
    total = -rate * n * delta - n * mp.log(2)
    for u in u_list:
        u = mp.mpf(u)
        z = rate * mp.sqrt(u) / speed
        total += (
            mp.log(rate)
            - mp.log(speed)
            + mp.log(
                mp.e ** (-z) * mp.besseli(0, z)
                + speed * delta * mp.e ** (-z) * mp.besseli(1, z) / mp.sqrt(u)
            )
            + z
        )
    return total


def main():
    print("# density values")
    print("p(0.3; t=1, rate=1, speed=1)   =", mp.nstr(density_ac(0.3, 1, 1, 1), 22))
    print("p(0.0; t=2, rate=0.5, speed=1.5) =", mp.nstr(density_ac(0.0, 2, 0.5, 1.5), 22))

    print("# mpmath normalisation cross-check (ac mass + 2 atoms)")
    for rate, speed, t in ((1, 1, 1), (2, 0.7, 3), (0.3, 2.0, 5)):
        ac = mp.quad(
            lambda x: density_ac(x, t, rate, speed),
            [-speed * t, 0, speed * t],
        )
        total = ac + mp.e ** (-mp.mpf(rate) * t)
        print(f"  rate={rate} speed={speed} t={t}: total={mp.nstr(total, 20)}")

    print("# single increment: delta=1 speed=1 dx=0.5 rate=0.1")
    u = float(1.0 - 0.5**2)
    print("  loglik =", mp.nstr(step_loglik(0.1, [u], 1, 1, 1), 22))

    print("# five-step sample X=[0,1,1.3,0.8,1.0,0.1], delta=1 speed=1")
    values = np.array([0.0, 1.0, 1.3, 0.8, 1.0, 0.1])
    dx = np.diff(values)
    u_all = (1.0 - dx**2).tolist()
    u_int = [u for u in u_all if mp.mpf(u) > CLASSIFY_TOL]
    print("  u (float64):", [repr(u) for u in u_all])
    print("  n_plus =", len(u_int))
    for rate in (0.7,):
        ll = step_loglik(rate, u_int, 5, 1, 1)
        sc = mp.diff(lambda r: step_loglik(r, u_int, 5, 1, 1), mp.mpf(rate))
        print(f"  loglik({rate}) =", mp.nstr(ll, 22))
        print(f"  score({rate})  =", mp.nstr(sc, 22))


if __name__ == "__main__":
    main()
