from fo2_trees.cli import main

main()
