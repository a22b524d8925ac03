#!/usr/bin/env python3
"""Write the 8x8 handwritten digits (UCI optdigits test set, as shipped with
scikit-learn) to CSV rows "label,p0,...,p63" with pixel values 0..16."""

import argparse

from sklearn.datasets import load_digits


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("output", help="CSV path")
    args = parser.parse_args()

    digits = load_digits()
    with open(args.output, "w") as out:
        for label, pixels in zip(digits.target, digits.data):
            out.write(",".join([str(int(label))] + [str(int(v)) for v in pixels]) + "\n")


if __name__ == "__main__":
    main()
