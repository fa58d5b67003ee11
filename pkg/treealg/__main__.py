from treealg.cli import main

main()
