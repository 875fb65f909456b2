from replirate.main import main

main()
