"""Export the 0-5 subset of the UCI handwritten digits (as bundled with
scikit-learn) to plain CSV files used by the digits experiment, plus a 2-D
t-SNE embedding used only for plotting."""
import csv
import sys
from pathlib import Path

from sklearn.datasets import load_digits
from sklearn.manifold import TSNE


def main(out_dir: Path) -> None:
    digits = load_digits(n_class=6)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "digits_0_5.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in digits.data:
            writer.writerow(int(v) for v in row)
    with open(out_dir / "digits_0_5_labels.txt", "w") as fh:
        for label in digits.target:
            fh.write(f"{int(label)}\n")
    embedding = TSNE(n_components=2, random_state=0).fit_transform(digits.data)
    with open(out_dir / "digits_0_5_tsne.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y"])
        for x, y in embedding:
            writer.writerow([f"{x:.6f}", f"{y:.6f}"])


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data"))
