from plie.cli import main

main()
