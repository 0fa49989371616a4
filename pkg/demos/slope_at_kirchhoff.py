"""The tracked eigenvalue mu2(alpha) crosses zero with slope 4 / (N sqrt(pi))."""
from lognls_star import eigencurve


def main():
    for n, k in [(3, 1), (5, 2), (7, 2)]:
        c = eigencurve(n, k)
        print(f"N={n} k={k}: fd slope {c.slope_fd:.6f}, Richardson {c.slope_richardson:.6f}, "
              f"closed form {c.slope_analytic:.6f}, gap {100 * c.relative_gap:.3f}%")


if __name__ == "__main__":
    main()
