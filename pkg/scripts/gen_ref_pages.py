"""Build the Code Reference pages of the fo2_trees docs, one page per public module."""

from pathlib import Path

import mkdocs_gen_files

ROOT = Path(__file__).parent.parent
PACKAGE = ROOT / "src" / "fo2_trees"

nav = mkdocs_gen_files.Nav()

for path in sorted(PACKAGE.rglob("*.py")):
    if "__pycache__" in path.parts:
        continue
    module = path.relative_to(ROOT / "src").with_suffix("")
    parts = tuple(module.parts)
    page = Path("reference", *parts).with_suffix(".md")

    # __main__ only forwards to the CLI
    if parts[-1] == "__main__":
        continue
    if parts[-1] == "__init__":
        parts = parts[:-1]
        page = page.with_name("index.md")

    nav[parts] = page.relative_to("reference").as_posix()
    with mkdocs_gen_files.open(page, "w") as fd:
        fd.write(f"::: {'.'.join(parts)}\n")
    mkdocs_gen_files.set_edit_path(page, path.relative_to(ROOT))

with mkdocs_gen_files.open("reference/SUMMARY.md", "w") as nav_file:
    nav_file.writelines(nav.build_literate_nav())
