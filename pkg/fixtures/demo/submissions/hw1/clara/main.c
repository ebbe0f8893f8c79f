#include <stdio.h>
#include <stdlib.h>

int gcd(int a, int b) {
    while (b != 0) {
        int t = b;
        b = a % b;
        a = t;
    }
    return a;
}

int compare(const void *lhs, const void *rhs) {
    return *(const int *)lhs - *(const int *)rhs;
}

int main(int argc, char **argv) {
    int values[5] = {9, 4, 7, 1, 8};
    qsort(values, 5, sizeof(int), compare);
    for (int i = 0; i < 5; i++) {
        printf("%d ", values[i]);
    }
    printf("\ngcd=%d\n", gcd(values[0], values[4]));
    return 0;
}
