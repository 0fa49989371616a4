"""Stability verdicts and Morse counts over a small (N, k, alpha) table."""
from lognls_star import stability_verdict


def main():
    print(f"{'N':>3} {'k':>3} {'alpha':>7}  {'n(T1)':>5} {'n(T2)':>5}  verdict")
    for n, k in [(3, 1), (5, 1), (5, 2), (7, 3)]:
        for alpha in (-1.0, 1.0):
            v = stability_verdict(n, k, alpha)
            print(f"{n:>3} {k:>3} {alpha:>7g}  {v.morse_t1!s:>5} {v.morse_t2!s:>5}  {v.status.value}")


if __name__ == "__main__":
    main()
