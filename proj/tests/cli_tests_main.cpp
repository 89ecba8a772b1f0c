// placeholder; filled in after the core builds
int main(int, char**) { return 0; }
